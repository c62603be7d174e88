from core.segmentation.mdl import SegmentFit, Segmentation, fit_segment_ar, mdl_score, segment

__all__ = ["SegmentFit", "Segmentation", "fit_segment_ar", "mdl_score", "segment"]
