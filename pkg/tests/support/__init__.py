"""Test support utilities.

This package provides builders for domain objects that are tedious to
construct by hand in tests (spectrum estimates, verdicts, reports).

テストで手作業では組み立てにくいドメインオブジェクトのビルダーを提供します。
"""
