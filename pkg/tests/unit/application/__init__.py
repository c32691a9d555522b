"""Application層のユースケーステスト用モジュール"""
