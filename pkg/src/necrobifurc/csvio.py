"""Deterministic CSV output: fixed headers, 17-significant-digit floats,
no locale dependence.  Identical inputs produce byte-identical files."""

import io


def format_value(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def render_csv(cols, rows):
    buf = io.StringIO()
    buf.write(",".join(cols) + "\n")
    for row in rows:
        buf.write(",".join(format_value(v) for v in row) + "\n")
    return buf.getvalue()


def write_csv(path, cols, rows):
    text = render_csv(cols, rows)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path
