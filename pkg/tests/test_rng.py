import math

from mvdyn.rng import SplitMix64


def test_reference_stream():
    r = SplitMix64(0)
    assert [r.next_u64() for _ in range(4)] == [
        0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F, 0xF88BB8A8724C81EC,
    ]


def test_uniform_range_and_repeatability():
    a, b = SplitMix64(42), SplitMix64(42)
    xs = [a.uniform() for _ in range(1000)]
    assert xs == [b.uniform() for _ in range(1000)]
    assert all(0.0 <= x < 1.0 for x in xs)


def test_gaussian_moments():
    r = SplitMix64(7)
    xs = [r.gauss() for _ in range(20000)]
    mean = sum(xs) / len(xs)
    var = sum((x - mean) ** 2 for x in xs) / len(xs)
    assert abs(mean) < 0.03 and abs(var - 1) < 0.05
    assert all(math.isfinite(x) for x in xs)
