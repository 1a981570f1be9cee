"""GCP-based image registration: template matching, polynomial warp
fitting and nearest-neighbour resampling."""

from ._gcpreg import (
    GcpregError,
    MatchResult,
    WarpModel,
    cra,
    edge_extract,
    fit_matches,
    fit_warp,
    match_all,
    mutual_information,
    ncc,
    place_gcps,
    read_image,
    register_image,
    resample_nn,
    ssd,
    synthesize,
    textured_reference,
    write_image,
)

__all__ = [
    "GcpregError",
    "MatchResult",
    "WarpModel",
    "cra",
    "edge_extract",
    "fit_matches",
    "fit_warp",
    "match_all",
    "mutual_information",
    "ncc",
    "place_gcps",
    "read_image",
    "register_image",
    "resample_nn",
    "ssd",
    "synthesize",
    "textured_reference",
    "write_image",
]
