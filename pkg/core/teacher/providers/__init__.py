from core.teacher.providers.exact import ExactPdfaTeacher
from core.teacher.providers.subprocess_jsonl import SubprocessTeacher


__all__ = ["ExactPdfaTeacher", "SubprocessTeacher"]
