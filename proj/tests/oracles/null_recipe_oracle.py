"""Independent numpy/scipy replica of the null-distribution recipe.

Used to cross-check the acceptance behaviour of the C++ filter (per-k
acceptance rates and the percentiles of M). Slow; run by hand.

    python3 null_recipe_oracle.py --n 100 --rho 0 --replicates 200
"""
import argparse

import numpy as np
from scipy import stats

B, M_, P, A, BETA0, BETA1 = -2.188, 7.031, 0.516, 1.287, 5.319, -5.532


def m_stat(rho, theta):
    L = (1 + np.exp(B)) / (1 + np.exp(B + M_ * theta))
    eta = P * theta ** A
    tau = BETA0 + BETA1 * theta
    return L / (1 + eta * np.exp(tau * rho))


def lattice(rows, cols):
    nb = [[] for _ in range(rows * cols)]
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if r > 0: nb[i].append(i - cols)
            if r < rows - 1: nb[i].append(i + cols)
            if c > 0: nb[i].append(i - 1)
            if c < cols - 1: nb[i].append(i + 1)
    return nb


def weights(nb):
    n = len(nb)
    W = np.zeros((n, n))
    for i, js in enumerate(nb):
        W[i, js] = 1.0 / len(js)
    return W


def regions(nb, k, rng, policy="region"):
    n = len(nb)
    label = -np.ones(n, dtype=int)
    seeds = rng.choice(n, size=k, replace=False)
    frontier = []
    for r, s in enumerate(seeds):
        label[s] = r
        frontier.append(set(nb[s]))
    while (label < 0).any():
        if policy == "edge":
            # uniform over (region, unassigned neighbour) pairs: big regions grow faster
            pairs = [(r, j) for r in range(k) for j in sorted(frontier[r]) if label[j] < 0]
            r, j = pairs[rng.integers(len(pairs))]
        else:
            active = [r for r in range(k) if any(label[j] < 0 for j in frontier[r])]
            r = active[rng.integers(len(active))]
            cand = sorted(j for j in frontier[r] if label[j] < 0)
            j = cand[rng.integers(len(cand))]
        label[j] = r
        frontier[r].update(nb[j])
    return label


def rho_hat(W, y, lam):
    y = y - y.mean()
    wy = W @ y
    wy = wy - wy.mean()
    n = len(y)

    def negll(rho):
        e = y - rho * wy
        return n / 2 * np.log(e @ e / n) - np.sum(np.log(np.abs(1 - rho * lam)))

    from scipy.optimize import minimize_scalar
    return minimize_scalar(negll, bounds=(-0.999, 0.999), method="bounded", options={"xatol": 1e-8}).x


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--rho", type=float, default=0.0)
    ap.add_argument("--replicates", type=int, default=200)
    ap.add_argument("--r", type=int, default=30)
    ap.add_argument("--center", default="mean")
    ap.add_argument("--policy", default="region", choices=["region", "edge"])
    ap.add_argument("--seed", type=int, default=1)
    a = ap.parse_args()
    side = int(round(a.n ** 0.5))
    nb = lattice(side, a.n // side)
    W = weights(nb)
    lam = np.linalg.eigvals(W).real
    inv = np.linalg.inv(np.eye(a.n) - a.rho * W)
    rng = np.random.default_rng(a.seed)
    tried, kept = np.zeros(a.n + 1), np.zeros(a.n + 1)
    ms = []
    while len(ms) < a.replicates:
        y = inv @ rng.standard_normal(a.n)
        for _ in range(50):
            k = int(rng.integers(a.n // 10 + 1, a.n))
            tried[k] += 1
            ok = True
            for _ in range(a.r):
                lab = regions(nb, k, rng, a.policy)
                means = np.bincount(lab, weights=y) / np.bincount(lab)
                if stats.levene(y, means, center=a.center).pvalue < 0.05:
                    ok = False
                    break
            if ok:
                kept[k] += 1
                ms.append(m_stat(rho_hat(W, y, lam), k / a.n))
                break
    print("percentiles 90/95/99:", np.percentile(ms, [90, 95, 99]))
    for lo in range(a.n // 10 + 1, a.n, 10):
        t, c = tried[lo:lo + 10].sum(), kept[lo:lo + 10].sum()
        print(f"k {lo:3d}-{lo + 9:3d}: tried {int(t):5d} kept {int(c):4d}")


if __name__ == "__main__":
    main()
