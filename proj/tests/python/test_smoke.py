from fractions import Fraction
import random

import cflab


def test_catalog():
    e = cflab.catalog_exponents()
    assert len(e) == 47
    assert e[-1] == 43112609


def test_mersenne_sum_digits():
    s = cflab.sum_fraction("mersenne", 12)
    assert cflab.to_decimal(s.numerator, s.denominator, 52) == (
        "0.5164541789407885653304873429715228588159685534154197"
    )


def test_cf_prefix():
    assert cflab.cf_of(cflab.sum_fraction("mersenne", 18))[:4] == [0, 1, 1, 14]


def test_round_trip_big():
    rng = random.Random(7)
    for _ in range(20):
        x = Fraction(rng.getrandbits(3000) - 2**2999, rng.getrandbits(2000) + 1)
        p, q = cflab.from_cf(cflab.cf_of(x))
        assert Fraction(p, q) == x


def test_small_cf():
    assert cflab.cf_expand(331, 651) == [0, 1, 1, 29, 11]
    assert cflab.cf_expand(-7, 3) == [-3, 1, 2]


def test_constants():
    assert abs(cflab.levy_constant() - 3.27582291872) < 1e-11
    k, err = cflab.khinchin_constant(1e-6)
    assert err <= 1e-6 and abs(k - 2.685452) < 1e-6


def test_running_stats():
    terms = cflab.cf_of(cflab.sum_fraction("mersenne", 18))
    k = cflab.running_khinchin(terms, 100)
    l = cflab.running_levy(terms, 100)
    assert k[-1][0] == len(terms) - 1
    assert all(v > 0 for _, v in k + l)


def test_cli(tmp_path):
    code, out, err = cflab.run_cli(["cf", "--rational", "331/651", "--out", str(tmp_path)])
    assert code == 0, err
    assert "quotients: 4" in out
    assert (tmp_path / "manifest.json").exists()
    code, _, _ = cflab.run_cli(["cf", "--mode", "bogus", "--rational", "1/2"])
    assert code == 2
