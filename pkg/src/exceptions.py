"""カスタム例外クラス

このモジュールは、AQFT貼り合わせ検証ツールで使用される例外クラスの階層を定義します。
すべての例外は基底クラス AqftGlueError を継承しており、エラーメッセージと対象
（インスタンス名・開集合名・表示名など）の情報を保持します。

例外階層:
    AqftGlueError (基底クラス)
    ├── UsageError: 事前条件違反（生成子表の不一致、安全範囲外の次数など）
    ├── ResourceError: 規則数・軌道サイズの上限超過（途中までの打ち切りログを保持）
    ├── ConfigError: 設定ファイルの読み込み・スキーマ検証エラー
    └── InvariantError: 構築時の不変条件違反（関手性、⊥の保存、コサイクル条件など）

検証レポートや判定結果は例外ではなく戻り値として返されます。例外は
「計算を続けられない」状況のみを表します。

使用例:
    try:
        presentation = complete(presentation)
    except AqftGlueError as e:
        print(f"エラー: {e}")
        if e.subject:
            print(f"対象: {e.subject}")
"""

from typing import Optional, Sequence


class AqftGlueError(Exception):
    """AQFT貼り合わせ検証に関する基底例外クラス"""

    def __init__(self, message: str, subject: Optional[str] = None) -> None:
        """
        初期化

        Args:
            message: エラーメッセージ
            subject: エラーが発生した対象（インスタンス名、開集合名など）
        """
        super().__init__(message)
        self.message = message
        self.subject = subject

    def __str__(self) -> str:
        if self.subject:
            return f"{self.message} (対象: {self.subject})"
        return self.message


class UsageError(AqftGlueError):
    """演算の事前条件が満たされていない場合の例外"""

    pass


class ResourceError(AqftGlueError):
    """規則数や軌道サイズが上限を超えた場合の例外"""

    def __init__(
        self,
        message: str,
        subject: Optional[str] = None,
        log: Optional[Sequence[str]] = None,
    ) -> None:
        """
        初期化

        Args:
            message: エラーメッセージ
            subject: エラーが発生した対象
            log: 打ち切りまでに記録されたログ行
        """
        super().__init__(message, subject)
        self.log = list(log or [])


class ConfigError(AqftGlueError):
    """インスタンス設定が読めない、または不正な場合の例外"""

    pass


class InvariantError(AqftGlueError):
    """構築時に不変条件が破れていた場合の例外"""

    pass
