from tripx.nn.modules import *
from tripx.nn.optimizers import *
from tripx.nn.parameter import Parameter, parameter
from tripx.nn.utils import clipgradnorm
