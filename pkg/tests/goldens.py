"""Frozen reference values for the golden-trace tests.

The run tables come from published worked examples of these procedures:
response vectors plus the stress sequences, estimates and bookkeeping
columns the original implementation printed for them.
"""

# --- 30-run quarter-point (3pod-style) test, starting triple (0, 22, 3) ----

Y_TP = [0, 1, 0, 1, 0, 1, 1, 1, 1, 0, 0, 0, 1, 0, 1,
        1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]
X_TP = [5.5, 16.5, 11.0, 13.8, 10.1, 14.7, 10.4, 11.7, 9.7,
        7.3, 7.8, 8.1, 12.2, 8.5, 11.8]  # operator overrides, runs 1-15

# EX column (exact recommendations, 6 decimals), all 30 live runs
EX_TP = [5.5, 16.5, 11.0, 13.75, 10.1, 14.7, 10.4, 11.7, 9.7,
         7.265078, 7.754301, 8.084262, 12.164304, 8.516679, 11.825443,
         11.712057, 11.408272, 11.155754, 12.463306, 12.276079, 12.110741,
         11.962789, 11.829108, 11.707202, 11.595231, 11.491698, 11.395498,
         11.305654, 11.221436, 11.142075]
ID_TP = ["I1(iii)", "I1(iii)", "I2(ib)", "I2(ib)", "I2(id)", "I2(id)",
         "rI2(id)", "I3", "I3", "II1"] + ["II2"] * 5 + ["III1"] + ["III2"] * 14
MUSIG_TP = (10.1707909, 0.9344091)
TERMINAL_RX_TP = 11.06718

# the per-step refinement bookkeeping rows (j, k, v, u, a, tau2, nu, b, x)
JVEC_TP = [
    (0.000000, 0.000000, 0.0000000, 0.00000000, 0.00000000, 3.1630046, 0, 0.0000000, 11.71206),
    (1.281552, 1.259256, 0.8455910, 0.25691424, 1.9676839, 2.6574786, 0, 0.8455910, 11.40827),
    (1.281552, 1.221520, 0.8529442, 0.21540766, 1.7173487, 2.2875485, 0, 0.8529442, 11.15575),
    (1.281552, 1.193150, 0.8586089, 0.18486973, 1.5228195, 2.0060253, 0, 0.8586089, 12.46331),
    (1.281552, 1.171100, 0.8630914, 0.16158850, 1.3674862, 1.7850553, 0, 0.8630914, 12.27608),
    (1.281552, 1.153497, 0.8667188, 0.14331974, 1.2406774, 1.6072417, 0, 0.8667188, 12.11074),
    (1.281552, 1.139135, 0.8697100, 0.12863984, 1.1352462, 1.4612038, 0, 0.8697100, 11.96279),
    (1.281552, 1.127203, 0.8722164, 0.11660810, 1.0462355, 1.3392043, 0, 0.8722164, 11.82911),
    (1.281552, 1.117136, 0.8743455, 0.10658089, 0.9701036, 1.2358098, 0, 0.8743455, 11.70720),
    (1.281552, 1.108534, 0.8761754, 0.09810449, 0.9042548, 1.1470983, 0, 0.8761754, 11.59523),
    (1.281552, 1.101099, 0.8777644, 0.09085065, 0.8467447, 1.0701710, 0, 0.8777644, 11.49170),
    (1.281552, 1.094611, 0.8791568, 0.08457652, 0.7960885, 1.0028406, 0, 0.8791568, 11.39550),
    (1.281552, 1.088901, 0.8803866, 0.07909884, 0.7511331, 0.9434269, 0, 0.8803866, 11.30565),
    (1.281552, 1.083838, 0.8814805, 0.07427688, 0.7109699, 0.8906183, 0, 0.8814805, 11.22144),
    (1.281552, 1.079317, 0.8824597, 0.07000091, 0.6748731, 0.8433765, 0, 0.8824597, 11.14208),
    (1.281552, 1.075256, 0.8833413, 0.06618415, 0.6422561, 0.8008694, 0, 0.8833413, 11.06718),
]

# same test with the skew parameter at 0.8 instead of 1: phase III stresses
X3_TP_LAM08 = [11.5538, 11.2419, 10.9851, 12.2560, 12.0678, 11.9022, 11.7545,
               11.6213, 11.5001, 11.3889, 11.2863, 11.1910, 11.1021, 11.0188,
               10.9404]

# log-scale run of the same test: (X analysis, RX user, TX user) per run
LOG_TP = [
    (1.70475, 5.5, 5.5), (2.80336, 16.5, 16.5), (2.3979, 9.5263, 11),
    (2.62467, 18.1293, 13.8), (2.31254, 10.0115, 10.1), (2.68785, 14.6941, 14.7),
    (2.34181, 10.3307, 10.4), (2.45959, 11.8756, 11.7), (2.27213, 9.6333, 9.7),
    (1.98787, 7.6627, 7.3), (2.05412, 8.0148, 7.8), (2.09186, 8.2731, 8.1),
    (2.50144, 8.4705, 12.2), (2.14007, 8.594, 8.5), (2.4681, 8.7617, 11.8),
    (2.46604, 11.7757, 11.7757), (2.45339, 11.6277, 11.6277),
    (2.44262, 11.5031, 11.5031), (2.50151, 12.2009, 12.2009),
    (2.49326, 12.1006, 12.1006), (2.48587, 12.0116, 12.0116),
    (2.4792, 11.9317, 11.9317), (2.47312, 11.8594, 11.8594),
    (2.46754, 11.7934, 11.7934), (2.46238, 11.7327, 11.7327),
    (2.45759, 11.6766, 11.6766), (2.45311, 11.6245, 11.6245),
    (2.44892, 11.5758, 11.5758), (2.44497, 11.5302, 11.5302),
    (2.44124, 11.4873, 11.4873),
]

# --- 20-run expanding-search (Neyer-style) test, triple (.6, 1.4, .1) ------

Y_NY = [0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 1, 1, 1]
RX_NY = [1.00, 1.20, 1.40, 1.80, 2.60, 4.20, 3.40, 3.80, 4.00, 4.10,
         4.28, 4.52, 5.55, 5.24, 6.37, 6.08, 7.38, 7.09, 6.89, 6.74]
EX_NY = [1.0, 1.2, 1.4, 1.8, 2.6, 4.2, 3.4, 3.8, 4.0, 4.1,
         4.280593, 4.522707, 5.546771, 5.243292, 6.371975, 6.080515,
         7.384476, 7.094232, 6.893254, 6.736082]
ID_NY = ["B0"] + ["B1"] * 5 + ["B3"] * 4 + ["B4", "I11"] + ["I12"] * 8

# --- 25-run memory up-down (Langlie-style) test, bounds (0, 5), rule (7,0,5)

Y_LG = [1, 1, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1,
        0, 0, 0]
RX_LG3 = [1.03150, .51575, .25788, .12894, .12894, .12894, .19341, .19341,
          .19341, .16118, .16118, .16118, .17729, .17729, .17729, .34652,
          .34652, .34652, .26190, .26190, .26190, .30421, .28306, .28306,
          .28306]
RX_LG2 = [2.5, 1.25, .625, .3125, .3125, .3125, .46875, .46875, .46875,
          .39062, .39062, .39062, .42968, .42968, .42968, .83984, .83984,
          .83984, .63476, .63476, .63476, .7373, .68603, .68603, .68603]
MUSIG_LG = (0.8625, 0.29107)

# --- confidence tables for the 30-run test above ----------------------------

FM_Q85 = (6.519019, 8.5, 10.48098, 0.0, 0.036882, 0.20788)
FM_AL15_Q85 = [
    (1.713070, 5.729148, 9.745225, 0.000000, 0.000001, 0.000022),
    (2.509827, 6.185638, 9.861449, 0.000000, 0.000010, 0.000186),
    (3.398713, 6.695708, 9.992703, 0.000000, 0.000100, 0.001497),
    (4.420058, 7.283250, 10.146441, 0.000000, 0.001000, 0.011317),
    (5.655082, 7.997030, 10.338979, 0.000000, 0.010000, 0.076799),
    (7.323686, 8.973297, 10.622909, 0.000000, 0.100000, 0.409826),
    (8.268435, 9.540542, 10.812648, 0.000000, 0.250000, 0.682622),
    (9.261870, 10.170791, 11.079711, 0.111940, 0.500000, 0.888060),
    (10.100920, 10.801040, 11.501160, 0.511901, 0.750000, 0.988099),
    (10.608143, 11.368284, 12.128426, 0.757232, 0.900000, 1.000000),
    (11.082057, 12.344552, 13.607046, 0.953990, 0.990000, 1.000000),
    (11.317805, 13.058332, 14.798859, 0.992728, 0.999000, 1.000000),
    (11.489465, 13.645874, 15.802283, 0.998986, 0.999900, 1.000000),
    (11.630368, 14.155944, 16.681520, 0.999869, 0.999990, 1.000000),
    (11.752583, 14.612434, 17.472285, 0.999984, 0.999999, 1.000000),
    (6.519019, 8.500000, 10.480981, 0.000000, 0.036882, 0.207880),
]

# --- trajectory endpoints of the 29-run simulated expanding-search test ----

TRAJ_UN = {
    8: (0.9873797, 0.04399377, 1.043760),
    9: (0.9838174, 0.03959259, 1.034557),
    10: (0.9609069, 0.05798142, 1.035213),
    11: (0.9642461, 0.05275399, 1.031853),
    12: (0.9832098, 0.07475745, 1.079015),
    13: (0.9854295, 0.07038439, 1.075631),
    14: (0.9834347, 0.06686423, 1.069125),
    15: (0.9816069, 0.06393483, 1.063543),
    16: (0.9932668, 0.06935069, 1.082143),
    17: (0.9931582, 0.06885981, 1.081406),
    18: (0.9928694, 0.06786451, 1.079841),
    19: (0.9923936, 0.06653730, 1.077665),
    20: (0.9916517, 0.06492514, 1.074857),
    21: (1.0032469, 0.08383680, 1.110688),
    22: (1.0124456, 0.12460515, 1.172133),
    23: (1.0122534, 0.12158827, 1.168075),
    24: (1.0120305, 0.11883798, 1.164328),
    25: (1.0117695, 0.11629103, 1.160802),
    26: (1.0114630, 0.11390552, 1.157439),
    27: (1.0111026, 0.11165430, 1.154193),
    28: (1.0106785, 0.10952007, 1.151034),
    29: (1.0101797, 0.10749281, 1.147937),
}

# 29-run (X, Y) dataset reconstructed by tools/reconstruct_un.py: replays
# as 8 + 6 + 15 runs and reproduces TRAJ_UN exactly at runs 8 and 29
X_UN = [1.0, 1.2, 1.1, 1.05, 0.95, 1.02, 0.963596, 0.95842, 1.038896,
        0.95024, 1.01903, 1.018148, 0.987884, 1.115281, 1.01214, 1.012366,
        0.999123, 1.006197, 0.822554, 0.840904, 1.052028, 1.103322, 0.746525,
        0.754502, 1.259122, 1.249293, 1.23967, 0.983804, 1.018484]
Y_UN = [0, 1, 1, 1, 0, 1, 0, 1, 1, 1, 1, 0, 0, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0,
        0, 1, 1, 1, 0, 1]
