from .module import Module
from .linear import Linear
from .embedding import Embedding
from .multihead import MultiHeadAttention
from .conv import WindowConv
