import numpy as np


class MisoError(Exception):
    """工具包所有领域错误的基类"""


class DimensionMismatch(MisoError, ValueError):
    """矩阵/向量维度不一致，或算子矩阵不是方阵"""


class SingularMatrix(MisoError, np.linalg.LinAlgError):
    """0 属于谱，主对数不存在"""


class BranchCut(MisoError, np.linalg.LinAlgError):
    """特征值落在负实轴 (-inf, 0] 上，主对数分支不可用"""


class ResolventViolation(MisoError, np.linalg.LinAlgError):
    """A - I 数值奇异，余生成元 (A+I)(A-I)^{-1} 无定义"""


class NonLatticeShift(MisoError, ValueError):
    """平移量不是网格步长的整数倍，或超出网格范围"""


class MatrixFormatError(MisoError, ValueError):
    """矩阵文件或权重 CSV 格式错误"""
