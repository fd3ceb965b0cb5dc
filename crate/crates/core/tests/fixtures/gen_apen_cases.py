"""Regenerates apen_cases.csv with approximate entropy (m=2, r=0.2*population
std, self-matches counted) from a plain template-matching loop."""
import math
import numpy as np


def apen(x, m=2, r_factor=0.2):
    x = np.asarray(x, dtype=float)
    n = len(x)
    r = r_factor * x.std()

    def phi(mm):
        count = n - mm + 1
        templates = [x[i:i + mm] for i in range(count)]
        total = 0.0
        for a in templates:
            c = sum(1 for b in templates if np.max(np.abs(a - b)) <= r)
            total += math.log(c / count)
        return total / count

    return max(phi(m) - phi(m + 1), 0.0)


cases = []
cases.append(("ramp_mod", [float(i % 7) for i in range(60)]))
rng = np.random.default_rng(5)
cases.append(("white_noise", list(rng.standard_normal(150))))
t = np.arange(120)
cases.append(("noisy_sine", list(np.sin(2 * np.pi * t / 12) + 0.05 * np.random.default_rng(6).standard_normal(120))))
cases.append(("random_walk", list(np.cumsum(np.random.default_rng(7).standard_normal(100)))))
cases.append(("short", [1.0, 3.0, 2.0, 5.0, 4.0, 4.5, 0.5, 2.5]))

with open("apen_cases.csv", "w") as f:
    f.write("name,apen,values\n")
    for name, v in cases:
        f.write(f"{name},{apen(v)!r},{' '.join(repr(float(a)) for a in v)}\n")
