from repositories.pdfa_repo import load_pdfa, save_dot, save_pdfa
from repositories.test_set_repo import read_test_set, write_test_set


__all__ = ["load_pdfa", "read_test_set", "save_dot", "save_pdfa", "write_test_set"]
