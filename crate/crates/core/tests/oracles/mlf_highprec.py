"""High-precision Mittag-Leffler series values used as frozen test oracles.

The double-precision series loses all accuracy once |z|^(1/alpha) grows past
~30 because the partial sums grow like exp(|z|^(1/alpha)) before cancelling.
This script sums the same power series with mpmath at 200 significant digits
and writes `mlf_highprec.csv` next to it.

    python3 mlf_highprec.py
"""

import csv
import os

import mpmath as mp

mp.mp.dps = 200


def mlf_series(alpha, b, z):
    alpha = mp.mpf(alpha)
    b = mp.mpf(b)
    total = mp.mpc(0)
    term_bound = mp.mpf(10) ** (-60)
    n = 0
    zn = mp.mpc(1)
    small = 0
    while True:
        term = zn / mp.gamma(alpha * n + b)
        total += term
        if abs(term) < term_bound * max(abs(total), mp.mpf(1)):
            small += 1
            if small > 5:
                break
        else:
            small = 0
        zn *= z
        n += 1
        if n > 20000:
            raise RuntimeError("series did not converge")
    return total


def ray_point(alpha, t, rho, beta_space):
    alpha = mp.mpf(alpha)
    mag = mp.mpf(t) ** alpha * mp.mpf(rho) ** mp.mpf(beta_space)
    return mag * mp.expj(-alpha * mp.pi / 2)


def main():
    rows = []
    for alpha in ("0.6", "0.75", "0.9"):
        a = mp.mpf(alpha)
        b_list = [("1", mp.mpf(1)), ("alpha", a), ("2", mp.mpf(2)),
                  ("alpha+1", a + 1), ("alpha+2", a + 2)]
        for t in ("0.5", "1", "2"):
            for rho in ("0.5", "1", "2", "4"):
                for beta_space in ("1.5", "2.5"):
                    z = ray_point(alpha, t, rho, beta_space)
                    if abs(z) > 20:
                        continue
                    for tag, b in b_list:
                        val = mlf_series(a, b, z)
                        rows.append([alpha, tag, mp.nstr(b, 20), t, rho, beta_space,
                                     mp.nstr(z.real, 25), mp.nstr(z.imag, 25),
                                     mp.nstr(val.real, 25), mp.nstr(val.imag, 25)])
    out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "mlf_highprec.csv")
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["alpha", "b_tag", "b", "t", "rho", "beta_space", "z_re", "z_im", "e_re", "e_im"])
        w.writerows(rows)
    print(f"wrote {len(rows)} rows to {out}")


if __name__ == "__main__":
    main()
