"""
Console templates for run and verification output
"""

RUN_BANNER = "🧪 {kind}: {title} (N={N}, eps={epsilon}, samples={samples}, seed={seed}, workers={workers})"

GROUP_LINE = "   N={N:<4} eps={epsilon:<6g} samples={samples:<6} ties={ties:<4} {stats}"

ESTIMATE_ITEM = "{name}={value}"

CHECK_LINE = "   {glyph} check {name}"

SUITE_LINE = "{glyph} {name:<16} {detail}"

ARTIFACTS_LINE = "📁 Artifacts written to {path}"

GS_HEADER = "# {title} (N={N}, eps={epsilon:g}, seed={seed}, sample={index})"
