#include <adiapass/linalg.hpp>
