"""
지연 Duffing 진동자 x'' + ax + bx(t-T) + x³ = 0 의 빠른 진동 주기해 수치 라이브러리
"""
__version__ = "0.1.0"
