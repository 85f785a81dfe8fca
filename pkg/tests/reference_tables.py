"""Published optimized-entropy tables: {(qcnr_db, n_bits[, k]): (h_min, R)}."""

import math

INF = math.inf

AVERAGE = {
    (INF, 8): (7.03, 2.45),
    (INF, 16): (14.36, 3.90),
    (20.0, 8): (6.93, 2.59),
    (20.0, 16): (14.28, 4.09),
    (10.0, 8): (6.72, 2.93),
    (10.0, 16): (14.11, 4.55),
    (0.0, 8): (6.11, 4.33),
    (0.0, 16): (13.57, 6.48),
    (-INF, 8): (0.0, None),
    (-INF, 16): (0.0, None),
}

_K = (5.0, 10.0, 15.0, 20.0)

WORST_8 = {(INF, 8, k): (7.03, 2.45) for k in (0.0,) + _K}
WORST_8.update(
    {
        (20.0, 8, k): v
        for k, v in zip(_K, [(6.79, 2.90), (6.58, 3.35), (6.40, 3.81), (6.23, 4.27)])
    }
)
WORST_8.update(
    {
        (10.0, 8, k): v
        for k, v in zip(_K, [(6.37, 3.88), (5.91, 5.35), (5.55, 6.85), (5.26, 8.36)])
    }
)
WORST_8.update(
    {
        (0.0, 8, k): v
        for k, v in zip(_K, [(5.50, 7.10), (4.75, 11.92), (4.25, 16.82), (3.88, 21.75)])
    }
)
WORST_8.update({(-INF, 8, k): (0.0, None) for k in _K})

WORST_16 = {(INF, 16, k): (14.36, 3.90) for k in (0.0,) + _K}
WORST_16.update(
    {
        (20.0, 16, k): v
        for k, v in zip(_K, [(14.20, 4.38), (14.05, 4.85), (13.91, 5.33), (13.79, 5.81)])
    }
)
WORST_16.update(
    {
        (10.0, 16, k): v
        for k, v in zip(_K, [(13.89, 5.40), (13.53, 6.92), (13.25, 8.46), (13.00, 9.99)])
    }
)
WORST_16.update(
    {
        (0.0, 16, k): v
        for k, v in zip(_K, [(13.20, 8.70), (12.56, 13.59), (12.12, 18.51), (11.77, 23.45)])
    }
)
WORST_16.update({(-INF, 16, k): (0.0, None) for k in _K})
