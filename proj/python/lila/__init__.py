"""Python bindings for the lila LiDAR semantic labeling toolkit."""

from ._lila import (
    NUM_CLASSES,
    UNLABELED,
    ConfusionMatrix,
    LilaError,
    Network,
    class_color,
    class_id,
    class_name,
    map_cityscapes,
    project_scan,
    read_scan,
    run,
)

__all__ = [
    "NUM_CLASSES",
    "UNLABELED",
    "ConfusionMatrix",
    "LilaError",
    "Network",
    "class_color",
    "class_id",
    "class_name",
    "map_cityscapes",
    "project_scan",
    "read_scan",
    "run",
]
