#!/usr/bin/env python3
"""AQFT 貼り合わせ検証ツール - エントリーポイント"""

import sys
from pathlib import Path

# リポジトリのルートをパスに追加
sys.path.insert(0, str(Path(__file__).parent))

from src.main import main  # noqa: E402

if __name__ == "__main__":
    main()
