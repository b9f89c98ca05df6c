"""Independent reference implementations used as test oracles."""

import math

# modes as ("1" | "w", age) with math.inf for the infinite age


def mult_add(p, q):
    return "w"


def mult_mul(p, q):
    return "1" if (p, q) == ("1", "1") else "w"


def age_add(j, k):
    return j if j == k else math.inf


def age_mul(j, k):
    return j + k


def add(m, n):
    return (mult_add(m[0], n[0]), age_add(m[1], n[1]))


def mul(m, n):
    return (mult_mul(m[0], n[0]), age_mul(m[1], n[1]))


def le(m, n):
    mult_ok = m[0] == n[0] or n[0] == "w"
    age_ok = m[1] == n[1] or n[1] == math.inf
    return mult_ok and age_ok


def universe(max_age=4):
    return [(p, a) for p in ("1", "w") for a in [*range(max_age + 1), math.inf]]
