import numpy as np
import tripx.autograd.graph as graph

from .autograd.functional import backward
from .autograd.mode import Autograd, nograd
from .tensors import Tensor, tensor

from .functional import (
    add,
    sub,
    mul,
    div,
    pow,
    matmul,
    square,
    sqrt,
    exp,
    log,
    neg,
    sum,
    mean,
    transpose,
    squeeze,
    unsqueeze,
    reshape,
    select,
    concat,
)

from .utils import zeros, zeroslike, oneslike, uniform, randn, item, to

np.set_printoptions(precision=4)
