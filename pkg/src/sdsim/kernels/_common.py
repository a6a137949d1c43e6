"""Constants shared by the numba and numpy kernels.

Both backends must produce identical bits, so every numeric constant lives
here and both implementations evaluate the same operations in the same order.
"""

import numpy as np

# stack-machine opcodes
OP_CONST = 0
OP_LOAD = 1
OP_TIME = 2
OP_ADD = 3
OP_SUB = 4
OP_MUL = 5
OP_DIV = 6
OP_MAX = 7
OP_MIN = 8
OP_RANDN = 9

# kernel error codes
ERR_NONE = 0
ERR_DIV_ZERO = 1
ERR_NONFINITE = 2
ERR_BOUNDS = 3

# splitmix64 finalizer
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
SEED_SALT = np.uint64(0x5DEECE66D2B7E151)
SH30 = np.uint64(30)
SH27 = np.uint64(27)
SH31 = np.uint64(31)
SH11 = np.uint64(11)
TWO_M53 = 1.0 / 9007199254740992.0

# Acklam's rational approximation to the standard normal quantile
# (relative error below 1.15e-9 over (0, 1)).
ACK_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
         1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
ACK_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
         6.680131188771972e+01, -1.328068155288572e+01)
ACK_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
         -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
ACK_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
         3.754408661907416e+00)
P_LOW = 0.02425
P_HIGH = 1.0 - P_LOW
