"""Stepping-kernel selection.

The compiled extension (_stepcore) is preferred; the pure-Python kernel
(_purestep) is the fallback and the arithmetic reference.  Both produce
bit-identical trajectories.  Set CHILSIM_PURE=1 to force the fallback.
"""

import os

from . import _purestep

if os.environ.get("CHILSIM_PURE") == "1":
    _kernel = _purestep
else:
    try:
        from . import _stepcore as _kernel
    except ImportError:
        _kernel = _purestep

step_block = _kernel.step_block
KERNEL_NAME = _kernel.KERNEL_NAME

EVENT_NONE = _purestep.EVENT_NONE
EVENT_V_RISE = _purestep.EVENT_V_RISE
EVENT_I_FALL = _purestep.EVENT_I_FALL

MODE_CODES = {"PRECHARGE": 0, "CC": 1, "CV": 2, "DONE": 3}


def available_kernels():
    """Name -> step_block for every kernel importable in this build."""
    kernels = {_purestep.KERNEL_NAME: _purestep.step_block}
    try:
        from . import _stepcore
    except ImportError:
        pass
    else:
        kernels[_stepcore.KERNEL_NAME] = _stepcore.step_block
    return kernels
