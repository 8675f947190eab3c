"""Independent reference computations used as test oracles.

Deliberately naive: plain Python floats, explicit loops and sums, no
closed forms and nothing imported from the package under test.
"""
from __future__ import annotations


def holt_recursion(y, alpha, beta, phi, l0, b0):
    """Return (levels, trends, fitted) by literal application of the smoothing equations."""
    levels, trends, fitted = [], [], []
    prev_l, prev_b = l0, b0
    for obs in y:
        fitted.append(prev_l + phi * prev_b)
        cur_l = alpha * obs + (1 - alpha) * (prev_l + phi * prev_b)
        cur_b = beta * (cur_l - prev_l) + (1 - beta) * phi * prev_b
        levels.append(cur_l)
        trends.append(cur_b)
        prev_l, prev_b = cur_l, cur_b
    return levels, trends, fitted


def damped_forecast(level, trend, phi, h):
    """level + (phi + phi^2 + ... + phi^h) * trend, summed term by term."""
    total = 0.0
    power = 1.0
    for _ in range(h):
        power *= phi
        total += power
    return level + total * trend


def sse(y, fitted):
    return sum((a - b) ** 2 for a, b in zip(y, fitted))


def column_means(rows):
    m = len(rows)
    return [sum(r[t] for r in rows) / m for t in range(len(rows[0]))]


def did_by_definition(treated_rows, control_rows, T):
    """Difference-in-differences with 1-based T; pre = t < T, post = t >= T."""
    tr = column_means(treated_rows)
    co = column_means(control_rows)
    pre = slice(0, T - 1)
    post = slice(T - 1, None)

    def avg(xs):
        return sum(xs) / len(xs)

    full = (avg(tr[post]) - avg(tr[pre])) - (avg(co[post]) - avg(co[pre]))
    post_only = avg(tr[post]) - avg(co[post])
    return full, post_only


def trailing_mean(values, window):
    out = []
    for t in range(len(values)):
        chunk = values[max(0, t - window + 1) : t + 1]
        out.append(sum(chunk) / len(chunk))
    return out
