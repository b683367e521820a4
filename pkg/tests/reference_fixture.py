"""Hand-checked reference rows for the accuracy-matrix row transforms.

Six accuracy rows (portfolio-total characteristic under six data-generation
models, three measures) with their known first-past-the-post, rank and
min-max-score transforms. Values were verified by hand: in every row the
indicator marks the minimum, ranks descend from 6 at the minimum, and the
scores follow 1 - (a - min)/(max - min) to three decimals.

The source tabulation of these rows prints the first rank row with the
fifth and sixth candidates swapped, contradicting both its own accuracy
row and the scored row; the internally consistent ranks are asserted here
(first row, last two entries).
"""

import numpy as np

STRATEGIES = ["strategy1", "strategy2", "strategy3", "strategy4", "strategy5", "strategy6"]

ROW_LABELS = [
    "gen1|total|rmse",
    "gen6|total|rmse",
    "gen1|total|qape0.5",
    "gen6|total|qape0.5",
    "gen1|total|qape0.95",
    "gen6|total|qape0.95",
]

ACCURACY_ROWS = np.array(
    [
        [333175, 634604, 333481, 502998, 590183, 512242],
        [460624, 707067, 460902, 691018, 688544, 707864],
        [218998, 509506, 220136, 342380, 439140, 358066],
        [284903, 470012, 283133, 447735, 436563, 473420],
        [638488, 1130219, 642936, 973300, 1104696, 974396],
        [854513, 1363886, 854983, 1341894, 1337557, 1357542],
    ],
    dtype=float,
)

W1_EXPECTED = np.array(
    [
        [1, 0, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [1, 0, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0],
    ],
    dtype=float,
)

W2_EXPECTED = np.array(
    [
        [6, 1, 5, 4, 2, 3],  # last two entries corrected, see module docstring
        [6, 2, 5, 3, 4, 1],
        [6, 1, 5, 4, 2, 3],
        [5, 2, 6, 3, 4, 1],
        [6, 1, 5, 4, 2, 3],
        [6, 1, 5, 3, 4, 2],
    ],
    dtype=float,
)

W3_EXPECTED = np.array(
    [
        [1.000, 0.000, 0.999, 0.437, 0.147, 0.406],
        [1.000, 0.003, 0.999, 0.068, 0.078, 0.000],
        [1.000, 0.000, 0.996, 0.575, 0.242, 0.521],
        [0.991, 0.018, 1.000, 0.135, 0.194, 0.000],
        [1.000, 0.000, 0.991, 0.319, 0.052, 0.317],
        [1.000, 0.000, 0.999, 0.043, 0.052, 0.012],
    ]
)

W3_TOLERANCE = 5e-4
