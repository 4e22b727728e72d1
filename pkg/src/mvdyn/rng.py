"""SplitMix64 stream with polar-method Gaussians.

A fixed, documented generator so seeded fixtures are reproducible across
platforms and implementations.  ``uniform`` takes the top 53 bits of each
64-bit output.
"""
from __future__ import annotations

import math

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & _MASK
        self._spare = None

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform on [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def gauss_pair(self) -> tuple:
        """Two independent standard normals (Marsaglia polar method)."""
        while True:
            u = 2.0 * self.uniform() - 1.0
            v = 2.0 * self.uniform() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                k = math.sqrt(-2.0 * math.log(s) / s)
                return u * k, v * k

    def gauss(self) -> float:
        if self._spare is not None:
            g, self._spare = self._spare, None
            return g
        g, self._spare = self.gauss_pair()
        return g

    def complex_gauss(self) -> complex:
        """One complex normal from one polar pair: real and imaginary parts."""
        a, b = self.gauss_pair()
        return complex(a, b)
