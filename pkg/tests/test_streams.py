import numpy as np

from geomedian.streams import NS_BOOT_MEDIAN, NS_DATA, child_seed, rademacher, substream


def test_substream_reproducible():
    a = substream(7, NS_DATA, 3).standard_normal(16)
    b = substream(7, NS_DATA, 3).standard_normal(16)
    assert np.array_equal(a, b)


def test_substream_keys_distinguish_everything():
    draws = {
        "base": substream(7, NS_DATA, 3).standard_normal(8).tobytes(),
        "seed": substream(8, NS_DATA, 3).standard_normal(8).tobytes(),
        "namespace": substream(7, NS_BOOT_MEDIAN, 3).standard_normal(8).tobytes(),
        "index": substream(7, NS_DATA, 4).standard_normal(8).tobytes(),
    }
    assert len(set(draws.values())) == 4


def test_child_seed_deterministic_and_keyed():
    assert child_seed(1, 2, 3) == child_seed(1, 2, 3)
    assert child_seed(1, 2, 3) != child_seed(1, 2, 4)
    assert child_seed(1, 2, 3) != child_seed(2, 2, 3)


def test_rademacher_values_and_balance():
    draws = rademacher(substream(0, 9), 20000)
    assert set(np.unique(draws)) == {-1.0, 1.0}
    assert abs(draws.mean()) < 4.0 / np.sqrt(20000)
