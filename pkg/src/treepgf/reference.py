"""Published reference values used by ``verify``."""

from __future__ import annotations

from fractions import Fraction as F

BST_UNSUCCESSFUL = {2: (F(5, 3), F(4, 3), F(2, 9)), 3: (F(13, 6), F(3), F(17, 36))}
BST_SUCCESSFUL = {2: (F(3, 2), F(1), F(1, 4)), 3: (F(17, 9), F(20, 9), F(44, 81))}
BST_PATH_MEANS = [F(0), F(0), F(1), F(8, 3), F(29, 6)]
BST_PATH_SECOND = {3: F(14, 3), 4: F(58, 3)}
BST_PATH_VARIANCE = {3: F(2, 9), 4: F(29, 36)}

DST_PATH_MEANS = {2: F(1), 3: F(5, 2), 4: F(35, 8)}
DST_PATH_SECOND = {3: F(4), 4: F(61, 4)}
DST_PATH_VARIANCE = {3: F(1, 4), 4: F(31, 64)}

C_SEQUENCE = {
    2: F(7),
    3: F(-19),
    4: F(2260, 9),
    5: F(-229621, 108),
    6: F(74250517, 2700),
    7: F(-30532750703, 81000),
    8: F(90558126238639, 14883750),
}
A_SEQUENCE = {
    2: F(7),
    3: F(-19),
    4: F(937, 9),
    5: F(-85981, 108),
    6: F(21096517, 2700),
    7: F(-7527245453, 81000),
    8: F(19281922400989, 14883750),
}

CONSTANT_C = "0.2660036454"
CONSTANT_D = "-0.4970105417"

# (n, key model, cost, probability) for unsuccessful search
SPOT_PROBABILITIES = [
    (2, "infinite", 2, F(1, 2)),
    (2, "finite", 2, F(1, 3)),
    (3, "finite", 3, F(1, 21)),
    (3, "finite", 1, F(2, 7)),
    (4, "infinite", 4, F(1, 64)),
    (4, "finite", 4, F(1, 273)),
    (4, "finite", 1, F(8, 65)),
]
