"""High-precision reference values frozen into the C++ unit tests.

Run with `python3 tests/oracle/derive.py`; uses mpmath only and shares no code
with the library.
"""
import itertools

import mpmath as mp

mp.mp.dps = 30


def exp_quadratic(mu):
    s = sum(x * x for x in mu)
    return 1 - mp.e ** (-s), [2 * x * mp.e ** (-s) for x in mu]


def pmc(mu):
    prod = mp.mpf(1)
    for x in mu:
        prod *= 1 - x
    grad = []
    for i in range(len(mu)):
        g = mp.mpf(1)
        for j, x in enumerate(mu):
            if j != i:
                g *= 1 - x
        grad.append(g)
    return 1 - prod, grad


def profile(mu, subset):
    comp = sorted((i for i in range(len(mu)) if i not in subset), key=lambda i: mu[i])
    return comp + sorted(subset)


def modified(mu, grad, subset):
    # Double-sum form over the sorted complement.
    order = profile(mu, subset)
    n = len(mu) - len(subset)
    p = [mu[i] for i in order[:n]]
    g = [grad[i] for i in order[:n]]
    total = sum(p[i] * (1 - p[i]) * g[i] ** 2 for i in range(n))
    for i in range(n):
        for j in range(i + 1, n):
            total += 2 * p[i] * (1 - p[j]) * g[i] * g[j]
    return total


def l1(mu, grad, subset):
    return sum(mp.sqrt(mu[i] * (1 - mu[i])) * grad[i] for i in range(len(mu)) if i not in subset) ** 2


def l2(mu, grad, subset):
    return sum(mu[i] * (1 - mu[i]) * grad[i] ** 2 for i in range(len(mu)) if i not in subset)


def best_per_arm(mu, grad):
    k = len(mu)
    best = None
    for r in range(k):
        for sub in itertools.combinations(range(k), r):
            v = modified(mu, grad, set(sub)) / (k - r)
            if best is None or v > best[0]:
                best = (v, sub)
    return best


def staircase_kl(p, eps):
    n = len(p)
    prev, acc, a, b = mp.mpf(0), mp.mpf(0), [], []
    for i in range(n):
        b.append(p[i] - prev)
        a.append(p[i] - prev - eps[i])
        prev = p[i]
        acc += eps[i]
    b.append(1 - prev)
    a.append(1 - prev + acc)
    return sum(x * mp.log(x / y) for x, y in zip(a, b) if x > 0)


def show(name, value):
    print(f"{name} = {mp.nstr(value, 20)}")


if __name__ == "__main__":
    mu = [mp.mpf("0.5"), mp.mpf("0.5")]
    show("exp_quadratic(0.5,0.5)", exp_quadratic(mu)[0])
    show("exp_quadratic_grad(0.5,0.5)", exp_quadratic(mu)[1][0])

    mu = [mp.mpf(x) for x in ("0.3", "0.7", "0.2", "0.55")]
    for sub in [(), (1,), (0, 3)]:
        v, g = exp_quadratic(mu)
        show(f"exp_quadratic modified {sub}", modified(mu, g, set(sub)))
        show(f"exp_quadratic l1 {sub}", l1(mu, g, set(sub)))
        show(f"exp_quadratic l2 {sub}", l2(mu, g, set(sub)))
        v, g = pmc(mu)
        show(f"pmc modified {sub}", modified(mu, g, set(sub)))
    v, g = exp_quadratic(mu)
    show("exp_quadratic best per-arm", best_per_arm(mu, g)[0])
    print("exp_quadratic best subset", best_per_arm(mu, g)[1])
    v, g = pmc(mu)
    show("pmc best per-arm", best_per_arm(mu, g)[0])
    print("pmc best subset", best_per_arm(mu, g)[1])

    p = [mp.mpf("0.25"), mp.mpf("0.5")]
    show("kl(0.25,0.5; 0.01,0.01)", staircase_kl(p, [mp.mpf("0.01")] * 2))
    p = [mp.mpf(x) for x in ("0.1", "0.35", "0.6", "0.8")]
    eps = [mp.mpf(x) for x in ("0.01", "-0.02", "0.015", "0.005")]
    show("kl(4-point)", staircase_kl(p, eps))

    # Scan value at N = 1 on the 1e-4 grid.
    best = max(
        (p0 * (1 - p0) * (2 * p0 * mp.e ** (-p0 * p0)) ** 2, p0)
        for p0 in (mp.mpf(i) / 10000 for i in range(1, 10000))
    )
    show("scan N=1 value", best[0])
    show("scan N=1 p0", best[1])
