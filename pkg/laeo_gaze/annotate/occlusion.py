"""Occlusion filter on face and body boxes."""

from typing import Iterable

from ..config import DETECT_CONFIG
from ..geometry import Box2D

KEEP = "keep"
DISCARD = "discard"


def occlusion_filter(
    face_box: Box2D,
    other_body_boxes: Iterable[Box2D],
    iou_threshold: float = DETECT_CONFIG["iou_threshold"],
) -> str:
    """
    Discard a face whose box overlaps another subject's body box.

    Returns ``"discard"`` when IOU(face, body) >= threshold for any other body,
    or when the face box has no area; ``"keep"`` otherwise.
    """
    if face_box.area <= 0:
        return DISCARD
    for body in other_body_boxes:
        if face_box.iou(body) >= iou_threshold:
            return DISCARD
    return KEEP
