"""Dense 3D conformal geometric algebra with motor-based pose interpolation.

The kernel (`algebra`, `blades`) provides 32-coefficient multivectors over
R(4,1); `motors` builds and decomposes translator/rotor/dilator versors;
`interp` blends poses through motor space with pooled, allocation-free
working buffers; `wire` and `simulate` implement the compact codecs and the
deterministic sender/receiver synchronization harness; `bench` measures the
pipelines; `playground` serves interactive multivector sessions.
"""

from .algebra import (
    AlgebraError,
    Multivector,
    add,
    dual,
    e1,
    e2,
    e3,
    e4,
    e5,
    e_inf,
    e_o,
    geometric_product,
    grade_part,
    inner_product,
    outer_product,
    pseudoscalar,
    reverse,
    scalar_mul,
)
from .classify import GeometricObject, Kind, classify
from .interp import (
    DegenerateInterpolantError,
    FreshInterpolator,
    InterpolationContext,
    PreprocessedPose,
    apply_interpolated,
    conventional_interpolate,
    interpolate,
    preprocess,
)
from .motors import (
    FlatObjectError,
    GeometryError,
    ImaginarySphereError,
    Motor,
    NotScalingMotorError,
    Pose,
    SingularMotorError,
    dilator,
    embed_plane,
    embed_point,
    embed_sphere,
    extract_sphere,
    extract_trd,
    motor_from_pose,
    motor_inverse,
    point_normalize,
    point_to_vec3,
    rotor,
    rotor_to_quat,
    sandwich,
    translator,
)
from .pool import AllocationMeter, MultivectorPool, PoolError
from .simulate import ChannelModel, MotionModel, Pipeline, Scene, SyncReport, run_simulation
from .wire import Codec, WireError, WireMessage, bytes_per_second, decode, encode, message_size

__version__ = "0.1.0"

__all__ = [
    "AlgebraError", "Multivector", "add", "dual", "e1", "e2", "e3", "e4", "e5",
    "e_inf", "e_o", "geometric_product", "grade_part", "inner_product",
    "outer_product", "pseudoscalar", "reverse", "scalar_mul",
    "GeometricObject", "Kind", "classify",
    "DegenerateInterpolantError", "FreshInterpolator", "InterpolationContext",
    "PreprocessedPose", "apply_interpolated", "conventional_interpolate",
    "interpolate", "preprocess",
    "FlatObjectError", "GeometryError", "ImaginarySphereError", "Motor",
    "NotScalingMotorError", "Pose", "SingularMotorError", "dilator",
    "embed_plane", "embed_point", "embed_sphere", "extract_sphere",
    "extract_trd", "motor_from_pose", "motor_inverse", "point_normalize",
    "point_to_vec3", "rotor", "rotor_to_quat", "sandwich", "translator",
    "AllocationMeter", "MultivectorPool", "PoolError",
    "ChannelModel", "MotionModel", "Pipeline", "Scene", "SyncReport",
    "run_simulation",
    "Codec", "WireError", "WireMessage", "bytes_per_second", "decode",
    "encode", "message_size",
    "__version__",
]
