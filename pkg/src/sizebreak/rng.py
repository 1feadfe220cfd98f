"""Counter-based pseudorandom streams built on the SplitMix64 finalizer.

The generator is fully specified here so that any implementation can
reproduce the same draws:

* ``mix64(z)``: ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
  z *= 0x94D049BB133111EB; z ^= z >> 31`` (all arithmetic mod 2**64).
* A stream key is derived from a 64-bit seed and a path of integers:
  ``key = mix64(seed)``, then for each path element ``p``:
  ``key = mix64(key ^ mix64(p + GAMMA))`` with ``GAMMA = 0x9E3779B97F4A7C15``.
* The ``i``-th raw 64-bit output of a stream is ``mix64(key + (i + 1) * GAMMA)``.
* Uniforms on [0, 1) are ``(raw >> 11) * 2**-53``.
* Standard normals use Box-Muller on consecutive pairs of raw outputs:
  ``u1 = ((raw[2j] >> 11) + 1) * 2**-53`` (in (0, 1]),
  ``u2 = (raw[2j+1] >> 11) * 2**-53``, ``g_j = sqrt(-2 ln u1) cos(2 pi u2)``.

Being counter based, the draw for (seed, path, index) never depends on how
many other draws were made, so parallel and serial evaluation agree.
"""

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1
_TWO_M53 = 2.0 ** -53


def mix64(z):
    """SplitMix64 finalizer, elementwise on a uint64 array."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = z ^ (z >> np.uint64(30))
        z = z * _M1
        z = z ^ (z >> np.uint64(27))
        z = z * _M2
    return z ^ (z >> np.uint64(31))


def _as_u64(v):
    if isinstance(v, np.ndarray):
        return v.astype(np.uint64)
    return np.asarray(int(v) & _MASK, dtype=np.uint64)


def stream_key(seed, *path):
    """Key for the stream addressed by ``seed`` and an integer ``path``.

    Path elements may be integer arrays; they broadcast against each other.
    """
    key = mix64(np.asarray(int(seed) & _MASK, dtype=np.uint64))
    for p in path:
        with np.errstate(over="ignore"):
            p = _as_u64(p) + GAMMA
        key = mix64(key ^ mix64(p))
    return key


def raw(key, n):
    """First ``n`` raw outputs of each stream in ``key`` (shape ``key.shape + (n,)``)."""
    key = np.asarray(key, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = key[..., None] + np.arange(1, n + 1, dtype=np.uint64) * GAMMA
    return mix64(z)


def uniform(key, n):
    return (raw(key, n) >> np.uint64(11)).astype(np.float64) * _TWO_M53


def normal(key, n):
    r = raw(key, 2 * n)
    u1 = ((r[..., 0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_M53
    u2 = (r[..., 1::2] >> np.uint64(11)).astype(np.float64) * _TWO_M53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
