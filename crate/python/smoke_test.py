"""Smoke test for the critbase Python bindings.

Build and install first:  pip install maturin && maturin develop -m crates/python/Cargo.toml
"""

import math

import critbase


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    u = critbase.EpWord("0110(01)")
    assert str(u.orbit_inf()) == "0(01)"
    assert str(critbase.EpWord("(01)").apply("M")) == "(0110)"
    assert critbase.EpWord("0(01)") < critbase.EpWord("(01)")

    close(critbase.solve_mu("0(01)"), 1.281972, 1e-5)
    close(critbase.solve_mu(u), 1.46811, 1e-5)
    close(critbase.mu_periodic_closed_form("M"), 4 / 3, 1e-10)

    top = critbase.critical_l(2.0)
    close(top["beta"], (3 + math.sqrt(5)) / 2, 1e-10)
    assert top["case"] == "TopG"
    close(critbase.critical_g(2.0)["beta"], 2.0, 1e-10)

    rows = critbase.scan(1.1, 1.9, 0.1)
    assert len(rows) == 9
    for m, g, l, _, _ in rows:
        assert 2 - 1e-9 <= g <= 1 + math.sqrt(m) + 1e-9 <= l + 2e-9 <= 1 + m + 3e-9

    (a1, b1), (a2, b2) = critbase.holes(9 / 4, 3 / 2)
    for got, want in zip((a1, b1, a2, b2), (4 / 9, 8 / 15, 2 / 3, 44 / 45)):
        close(got, want, 1e-12)

    assert critbase.is_unique("(0)", 2.2, 1.5) == "unique"
    assert critbase.pair_certificate("001", "00101", critbase.critical_l(1.45)["beta"] + 0.05, 1.45)
    assert critbase.hutchinson_dim(3, 5, 2.37) > 0
    assert 1.7872 <= critbase.komornik_loreti_root() <= 1.7873
    assert critbase.limit_word_prefix("MRMR", 6) == "011010"

    try:
        critbase.solve_mu("1(0)")
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")
    print("critbase smoke test passed")


if __name__ == "__main__":
    main()
