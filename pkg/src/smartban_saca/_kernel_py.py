"""Pure-Python slot loop, used when the compiled extension is unavailable.

Counter layout (shared with the compiled kernel):
attempts, collided attempts, success slots, collision slots, idle slots,
delay sum, delay samples.
"""

ATTEMPTS, COLLIDED, SUCCESS, COLLISION, IDLE, DELAY_SUM, DELAY_SAMPLES = range(7)


def run_chunk(draws, slot0, failures, alpha, hol, cp_max, cp_min, counters):
    n, length = draws.shape
    rows = draws.T.tolist()
    f = failures.tolist()
    a = alpha.tolist()
    h = hol.tolist()
    c = counters.tolist()
    floor2 = 2.0 * cp_min

    for s in range(length):
        u = rows[s]
        tx = [i for i in range(n) if u[i] < a[i]]
        ntx = len(tx)
        c[ATTEMPTS] += ntx
        if ntx == 0:
            c[IDLE] += 1
        elif ntx == 1:
            w = tx[0]
            slot = slot0 + s
            c[SUCCESS] += 1
            c[DELAY_SUM] += slot - h[w] + 1
            c[DELAY_SAMPLES] += 1
            h[w] = slot + 1
            f[w] = 0
            a[w] = cp_max
        else:
            c[COLLISION] += 1
            c[COLLIDED] += ntx
            for i in tx:
                f[i] += 1
                if f[i] % 2 == 0 and a[i] >= floor2:
                    a[i] = a[i] * 0.5

    failures[:] = f
    alpha[:] = a
    hol[:] = h
    counters[:] = c
