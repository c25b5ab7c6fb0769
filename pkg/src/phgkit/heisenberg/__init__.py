from .kernels import (CONVENTION, KernelGrid, grid_decay_slopes,
                      kernel_from_symbol, prop123_check,
                      pushforward_chart_t1, quantize, theorem108_check)
from .model import HeisenbergModel, heis_dilate, standard_block_matrix
