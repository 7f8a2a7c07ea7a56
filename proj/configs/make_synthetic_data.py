"""Writes configs/data/synthetic_quarterly.csv: three macro-like series and four drivers."""
from pathlib import Path

import numpy as np

rng = np.random.default_rng(2024)
T = 160
out = Path(__file__).with_name("data")
out.mkdir(exist_ok=True)
y = np.zeros((T, 3))
z = rng.standard_normal((T, 4))
for t in range(1, T):
    a = np.array([[0.5, 0.1, 0.0], [0.1, 0.4, 0.0], [0.1, 0.2, 0.8]])
    a[0, 0] += 0.02 * np.cumsum(z[:t, 0])[-1] / np.sqrt(t)  # slowly drifting persistence
    y[t] = a @ y[t - 1] + 0.5 * rng.standard_normal(3)
gdp = 100 * np.exp(np.cumsum(0.005 + 0.01 * y[:, 0]))
prices = 100 * np.exp(np.cumsum(0.006 + 0.004 * y[:, 1]))
rate = 3 + y[:, 2]
with open(out / "synthetic_quarterly.csv", "w") as f:
    f.write("date,GDP,PRICES,RATE,Z1,Z2,Z3,Z4\n")
    for t in range(T):
        row = [gdp[t], prices[t], rate[t], *z[t]]
        f.write(f"{1980 + t // 4}Q{t % 4 + 1}," + ",".join(f"{v:.6f}" for v in row) + "\n")
