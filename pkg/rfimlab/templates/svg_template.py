"""
SVG fragments for the report chart
"""

SVG_DOCUMENT = """<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="monospace" font-size="12">
<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>
<text x="{title_x}" y="20" text-anchor="middle" font-size="14">{title}</text>
{body}
</svg>
"""

SVG_AXES = """<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>
<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>
<text x="{x_label_x}" y="{x_label_y}" text-anchor="middle">{x_label}</text>
<text x="14" y="{y_label_y}" text-anchor="middle" transform="rotate(-90 14 {y_label_y})">{y_label}</text>"""

SVG_TICK_X = """<line x1="{x}" y1="{y}" x2="{x}" y2="{y_end}" stroke="black"/>
<text x="{x}" y="{y_text}" text-anchor="middle">{label}</text>"""

SVG_TICK_Y = """<line x1="{x}" y1="{y}" x2="{x_end}" y2="{y}" stroke="black"/>
<text x="{x_text}" y="{y}" text-anchor="end" dominant-baseline="middle">{label}</text>"""

SVG_POINT = """<circle cx="{x:.2f}" cy="{y:.2f}" r="3.5" fill="{color}"/>"""

SVG_ERROR_BAR = """<line x1="{x:.2f}" y1="{y_low:.2f}" x2="{x:.2f}" y2="{y_high:.2f}" stroke="{color}"/>"""

SVG_FIT_LINE = """<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="{color}" stroke-dasharray="6 4"/>"""

SVG_LEGEND = """<text x="{x}" y="{y}" fill="{color}">{text}</text>"""

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
