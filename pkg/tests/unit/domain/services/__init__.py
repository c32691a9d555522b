"""Domain Services のユニットテスト"""
