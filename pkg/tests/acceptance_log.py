"""Collects one verdict line per acceptance criterion for the end-of-run summary."""
LINES: list[str] = []


def record(cid, name, passed, summary, seconds):
    mark = {True: "PASS", False: "FAIL", None: "SKIP"}[passed]
    LINES.append(f"{mark}  criterion {cid:>2}  {name}  [{seconds:.1f}s]  {summary}")
