"""Regenerates the fixtures and prints the frozen reference values used by
the integration tests. Needs numpy, statsmodels and arch."""
import numpy as np
from statsmodels.tsa.stattools import adfuller
from statsmodels.tsa.vector_ar.vecm import coint_johansen
import statsmodels.api as sm
from arch.unitroot import PhillipsPerron, DFGLS

HERE = __file__.rsplit("/", 1)[0]


def write(name, start, values):
    with open(f"{HERE}/{name}", "w") as f:
        f.write("period,value\n")
        for i, v in enumerate(values):
            f.write(f"{start + i},{v!r}\n")


rng = np.random.default_rng(20240101)
walk = np.cumsum(0.3 + rng.standard_normal(60))
write("walk.csv", 1950, walk.tolist())

for trend, reg in (("c", "c"), ("ct", "ct")):
    for lags in (0, 2):
        stat = adfuller(walk, maxlag=lags, regression=reg, autolag=None)[0]
        print(f"adf {trend} lags={lags}: {stat!r}")
for trend in ("c", "ct"):
    for bw in (3,):
        pp = PhillipsPerron(walk, lags=bw, trend=trend, test_type="tau")
        pr = PhillipsPerron(walk, lags=bw, trend=trend, test_type="rho")
        print(f"pp {trend} bw={bw}: tau={pp.stat!r} rho={pr.stat!r}")
for trend in ("c", "ct"):
    for lags in (0, 2):
        print(f"dfgls {trend} lags={lags}: {DFGLS(walk, lags=lags, trend=trend).stat!r}")

# Cointegrated pair: x is a random walk, y = 0.8 x + stationary AR(1).
rng = np.random.default_rng(77)
x = np.cumsum(rng.standard_normal(120))
u = np.zeros(120)
e = rng.standard_normal(120)
for t in range(1, 120):
    u[t] = 0.4 * u[t - 1] + e[t]
y = 0.8 * x + u
write("pair_x.csv", 1880, x.tolist())
write("pair_y.csv", 1880, y.tolist())


def johansen(Y, max_lag, rconstant):
    """Reduced-rank regression with the level at t-1."""
    n, K = Y.shape
    dY = np.diff(Y, axis=0)
    rows = range(max_lag, n)
    Z0 = np.array([dY[t - 1] for t in rows])
    Z1 = np.array([Y[t - 1] for t in rows])
    if rconstant:
        Z1 = np.column_stack([Z1, np.ones(len(Z1))])
    if max_lag > 1:
        Z2 = np.array([np.concatenate([dY[t - 1 - j] for j in range(1, max_lag)]) for t in rows])
        proj = lambda A: A - Z2 @ np.linalg.lstsq(Z2, A, rcond=None)[0]
        Z0, Z1 = proj(Z0), proj(Z1)
    T = len(Z0)
    S00, S01, S11 = Z0.T @ Z0 / T, Z0.T @ Z1 / T, Z1.T @ Z1 / T
    M = np.linalg.solve(S11, S01.T @ np.linalg.solve(S00, S01))
    lam = np.sort(np.linalg.eigvals(M).real)[::-1][:K]
    trace = [-T * np.sum(np.log(1 - lam[r:])) for r in range(K)]
    return lam, trace


P = np.column_stack([x, y])
for max_lag in (1, 2):
    lam, tr = johansen(P, max_lag, False)
    print(f"johansen none max_lag={max_lag}: eig={lam.tolist()!r} trace={tr!r}")
    lam, tr = johansen(P, max_lag, True)
    print(f"johansen rconstant max_lag={max_lag}: eig={lam.tolist()!r} trace={tr!r}")
# Cross-check the direct version against statsmodels where their conventions agree.
j = coint_johansen(P, det_order=-1, k_ar_diff=1)
assert np.allclose(j.eig, johansen(P, 2, False)[0], rtol=1e-10)

# Small OLS problem.
X = np.array([[1, 0.5, 2.0], [1, 1.5, -1.0], [1, 2.0, 0.5], [1, 3.5, 1.5], [1, 4.0, -0.5], [1, 5.5, 2.5]])
yy = np.array([1.2, 2.9, 3.1, 5.8, 6.6, 9.4])
fit = sm.OLS(yy, X).fit()
print("ols coef", fit.params.tolist())
print("ols se", fit.bse.tolist())

# Bartlett long-run variance, bandwidth 2, uncentered, divisor n.
u10 = np.array([0.3, -0.1, 0.4, -0.5, 0.2, 0.0, -0.3, 0.6, -0.2, 0.1])
n = len(u10)
g = [np.dot(u10[k:], u10[: n - k]) / n for k in range(3)]
print("lrv", g[0] + 2 * sum((1 - k / 3) * g[k] for k in (1, 2)))

# Calibration fixture: driver growth rates and a noisy response.
years_driver = np.arange(1966, 2011)
t = years_driver - 1970
g = 0.035 - 0.0015 * t + 0.025 * np.sin(2 * np.pi * t / 14) + 0.01 * np.cos(2.1 * t)
write("calib_driver.csv", 1966, g.tolist())
rng = np.random.default_rng(7)
years = np.arange(1970, 2010)
gd = dict(zip(years_driver, g))
resp = np.array([0.5 * gd[t - 1] + 0.006 for t in years]) + 0.002 * rng.standard_normal(len(years))
write("calib_response.csv", 1970, resp.tolist())

cy = np.cumsum(resp)
k = np.arange(1, len(years) + 1)
best = None
for lag in range(-1, 4):
    cg = np.cumsum([gd[t - lag] for t in years])
    # Exact continuous minimizer: least squares on the cumulative curves.
    A = np.column_stack([cg, k])
    (a, b), *_ = np.linalg.lstsq(A, cy, rcond=None)
    obj = np.sqrt(np.mean((cy - a * cg - b * k) ** 2))
    # Brute force at ten times the default resolution around the truth.
    slopes = np.round(np.arange(0.3, 0.7 + 1e-9, 0.001), 10)
    icpts = np.round(np.arange(0.0, 0.012 + 1e-12, 0.00005), 10)
    S, B = np.meshgrid(slopes, icpts, indexing="ij")
    res = cy[None, None, :] - S[..., None] * cg[None, None, :] - B[..., None] * k[None, None, :]
    f = np.sqrt(np.mean(res**2, axis=2))
    i, j = np.unravel_index(np.argmin(f), f.shape)
    cand = (obj, lag, a, b, f[i, j], slopes[i], icpts[j])
    print(f"calib lag={lag}: continuous a={a!r} b={b!r} obj={obj!r}; fine grid a={slopes[i]} b={icpts[j]} obj={f[i, j]!r}")
    if best is None or obj < best[0]:
        best = cand
print("calib best", best)
