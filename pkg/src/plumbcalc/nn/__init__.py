from .autodiff import (
    ParamStore,
    Segments,
    Tensor,
    cross_entropy,
    grad_check,
    no_grad,
    softmax,
)
from .layers import (
    GraphBatch,
    affine,
    gat_layer,
    gated_aggregate,
    gcn_layer,
    gen_layer,
    mlp_forward,
)
