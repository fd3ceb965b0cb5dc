"""Regenerates adf_cases.csv: 20 random walks and 20 AR(1) (phi=0.3) series of
length 200 with their 5% ADF decisions from statsmodels (constant-only
regression, fixed Schwert lag order, no autolag)."""
import math
import numpy as np
from statsmodels.tsa.stattools import adfuller

N = 200
LAGS = min(int(12 * (N / 100) ** 0.25), (N - 1) // 3)

rows = []
for seed in range(20):
    rng = np.random.default_rng(1000 + seed)
    rows.append(("random_walk", seed, np.cumsum(rng.standard_normal(N))))
for seed in range(20):
    rng = np.random.default_rng(2000 + seed)
    e = rng.standard_normal(N)
    y = np.zeros(N)
    y[0] = e[0]
    for t in range(1, N):
        y[t] = 0.3 * y[t - 1] + e[t]
    rows.append(("ar1", seed, y))

with open("adf_cases.csv", "w") as f:
    f.write("kind,seed,statistic,pvalue,stationary,values\n")
    for kind, seed, y in rows:
        stat, pvalue, *_ = adfuller(y, maxlag=LAGS, autolag=None, regression="c")
        vals = " ".join(repr(float(v)) for v in y)
        f.write(f"{kind},{seed},{float(stat)!r},{float(pvalue)!r},{int(pvalue < 0.05)},{vals}\n")
