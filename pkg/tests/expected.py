"""Frozen reference values.

Produced by ``tests/oracles/formula_oracle.py`` (mpmath, 50 digits) and by
hand where noted; ``test_oracles.py`` re-runs the oracle to confirm they
stay in sync.
"""

# normalised activity, A = 6
R_Y1_TP1000 = 0.50074962518740629685  # 1002 / 2001
R_Y1E9_TP1 = 1.999999997000000006

# ceil(6*log2(0.7)) with 6*log2(0.7) = -3.08743903698
OFFSET_R07 = -3

# all-intra lambda and refined q
LAMBDA_AI = {
    12: 0.57,
    22: 5.7452399875206216313,
    27: 18.24,
    32: 57.908390375799916839,
    37: 183.8476796006598922,
}
Q_AI = {12: 11, 22: 21, 27: 26, 32: 31, 37: 36}

# random access B pictures, BF = 7, clamp mode; lambda evaluated at the frame QP given
LAMBDA_RA = {
    (22, True): 8.9101616648565430212,
    (22, False): 13.707941022856220033,
    (27, True): 35.36,
    (27, False): 54.4,
    (32, True): 149.68133652692142247,
    (32, False): 230.2789792721868038,
    (37, True): 570.25034655081875336,
    (37, False): 877.30822546279808209,
}
Q_RA = {
    (22, True): 23, (22, False): 25,
    (27, True): 29, (27, False): 30,
    (32, True): 35, (32, False): 37,
    (37, True): 40, (37, False): 42,
}

WK_RA_QP37_CLAMP = 2.72
WK_RA_QP37_LITERAL = 1.36
H_BF7_CLAMP = 0.65

PSNR_8BIT_MSE1 = 48.130803608679103412

# hand-computed: round-half-up of 255 * (qp - 30) / 7
HEATMAP_QPS = [
    [30, 31, 32, 33],
    [34, 35, 36, 37],
    [30, 30, 37, 37],
    [33, 34, 35, 36],
]
HEATMAP_PGM = (
    b"P5\n4 4\n255\n"
    + bytes([0, 36, 73, 109,
             146, 182, 219, 255,
             0, 0, 255, 255,
             109, 146, 182, 219])
)
