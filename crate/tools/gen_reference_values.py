#!/usr/bin/env python3
"""High-precision reference values for the closed-form threshold calculators.

Evaluates each threshold formula with mpmath at 60 decimal digits and prints
Rust-ready constants. The frozen outputs live in the acceptance test suite;
rerun this script if the parameter points change.
"""

from mpmath import mp, mpf, log, tanh, cosh, exp, sqrt

mp.dps = 60


def two_terms(delta, t1, t2):
    best = max(t1, t2)
    name = "hamming-term" if t1 >= t2 else "connectivity-term"
    return (1 - delta) * best, name


def path_restricted(p, eta, lam, delta):
    p, lam, delta = mpf(p), mpf(lam), mpf(delta)
    t1 = log(p / 2) / (lam * tanh(lam))
    t2 = (1 + cosh(2 * lam) ** (eta - 1)) / (2 * lam) * log(p / (2 * (eta + 1)))
    return two_terms(delta, t1, t2)


def path_length(p, eta, gamma, nu, lam, delta):
    p, nu, lam, delta = mpf(p), mpf(nu), mpf(lam), mpf(delta)
    t_nu = (p ** (1 - nu) - (eta + 1)) / gamma
    t1 = log(p / 2) / (lam * tanh(lam))
    ratio = (1 + tanh(lam) ** (gamma + 1)) / (1 - tanh(lam) ** (gamma + 1))
    big = cosh(2 * lam) ** (eta - 1) * ratio ** t_nu
    t2 = (1 + big) / (2 * lam) * nu * log(p)
    return two_terms(delta, t1, t2)


def girth(p, g, d, nu, lam, delta):
    p, nu, lam, delta = mpf(p), mpf(nu), mpf(lam), mpf(delta)
    d_nu = min(mpf(d), p ** (1 - nu) / g)
    t1 = log(p / 2) / (lam * tanh(lam))
    ratio = (1 + tanh(lam) ** (g - 1)) / (1 - tanh(lam) ** (g - 1))
    t2 = (1 + ratio ** d_nu) / (2 * lam) * nu * log(p)
    return two_terms(delta, t1, t2)


def dregular(p, d, lam, delta):
    p, lam, delta = mpf(p), mpf(lam), mpf(delta)
    t1 = log(p * d / 4) / (lam * tanh(lam))
    t2 = exp(lam * d) / (2 * lam * d * exp(lam)) * log(p * d / 4)
    return two_terms(delta, t1, t2)


def edge_bounded(k, lam, delta):
    lam, delta = mpf(lam), mpf(delta)
    t1 = log(mpf(k) / 2) / (lam * tanh(lam))
    s = sqrt(mpf(2 * k))
    t2 = exp(lam * (s - 1)) / (2 * lam * exp(lam) * (s + 1)) * log(mpf(k) / 2)
    return two_terms(delta, t1, t2)


CASES = [
    ("path_restricted", path_restricted,
     [(1000, 3, "0.2", "0.1"), (500, 5, "0.4", "0.2"), (200, 2, "1.0", "0.05")]),
    ("path_length", path_length,
     [(10000, 2, 3, "0.5", "0.1", "0.1"), (1000, 3, 2, "0.4", "0.8", "0.1"),
      (5000, 2, 4, "0.6", "0.2", "0.05")]),
    ("girth", girth,
     [(10000, 5, 4, "0.5", "0.2", "0.1"), (1000, 3, 6, "0.5", "0.5", "0.1"),
      (500, 4, 3, "0.3", "0.3", "0.2")]),
    ("dregular", dregular,
     [(1000, 9, "0.3", "0.1"), (1000, 3, "0.1", "0.1"), (200, 5, "1.0", "0.2")]),
    ("edge_bounded", edge_bounded,
     [(50, "0.3", "0.1"), (9, "0.5", "0.1"), (1000, "0.2", "0.05")]),
]


def main():
    for name, fn, points in CASES:
        print(f"// {name}")
        for args in points:
            value, winner = fn(*args)
            pretty = ", ".join(str(a) for a in args)
            print(f"({pretty}) -> {mp.nstr(value, 17)}  [{winner}]")
        print()


if __name__ == "__main__":
    main()
