#!/usr/bin/env python3
"""Write the service's OpenAPI description to docs/openapi.json.

Run from the repository root (or anywhere; paths are resolved relative to
this file). The schema depends only on route and model declarations, so an
empty store registry is enough.
"""

from __future__ import annotations

import json
from pathlib import Path

from texture.api import create_app


def main() -> None:
    out_dir = Path(__file__).resolve().parents[1] / "docs"
    out_dir.mkdir(exist_ok=True)
    app = create_app({})
    doc = app.openapi()
    out_path = out_dir / "openapi.json"
    out_path.write_text(
        json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {out_path}")


if __name__ == "__main__":
    main()
