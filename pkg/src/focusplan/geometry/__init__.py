from focusplan.geometry.bvh import BVH, build_bvh, segments_occluded
from focusplan.geometry.mesh import MeshError, TriangleMesh, load_mesh, save_obj
from focusplan.geometry.sampling import SampleSet, SurfaceSample, sample_surface
from focusplan.geometry.visibility import VisibilityTable, build_visibility

__all__ = [
    "BVH", "build_bvh", "segments_occluded",
    "MeshError", "TriangleMesh", "load_mesh", "save_obj",
    "SampleSet", "SurfaceSample", "sample_surface",
    "VisibilityTable", "build_visibility",
]
