"""High-precision Mittag-Leffler reference values (200 significant digits).

Regenerate with `python3 mlf_oracle.py`; the printed literals are frozen into
`mittag_leffler_oracle.rs`.
"""
from mpmath import mp, mpf, gamma, fabs, log, loggamma, exp

mp.dps = 200


def mlf(beta, mu, x):
    beta, mu, x = mpf(beta), mpf(mu), mpf(x)
    total = mpf(0)
    peak = mpf(0)
    n = 0
    while True:
        term = x**n / gamma(beta * n + mu)
        total += term
        peak = max(peak, fabs(term))
        if n > 10 and fabs(term) < mpf(10) ** (-210) * max(fabs(total), 1):
            break
        n += 1
    return total, peak


GRID = [
    (0.5, 1.0, -2.0),
    (0.5, 1.0, 1.5),
    (0.5, 0.5, 5.0),
    (0.8, 0.8, 0.3),
    (0.8, 1.0, -5.0),
    (0.8, 1.2, 3.0),
    (1.0, 2.0, 4.0),
    (1.2, 1.0, -3.0),
    (1.5, 1.5, -5.0),
    (1.5, 1.0, 2.5),
    (2.0, 1.0, -5.0),
    (0.6, 0.6, 5.0),
]

if __name__ == "__main__":
    v, _ = mlf(0.5, 1.0, 1.0)
    print("E_0.5(1) =", mp.nstr(v, 25))
    for b, m, x in GRID:
        v, peak = mlf(b, m, x)
        print(f"({b}, {m}, {x}, {mp.nstr(v, 20)}),  # peak/value = {mp.nstr(peak / fabs(v), 3)}")
