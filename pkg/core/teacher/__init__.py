from core.teacher.factory import create_teacher
from core.teacher.provider import Teacher


__all__ = ["Teacher", "create_teacher"]
