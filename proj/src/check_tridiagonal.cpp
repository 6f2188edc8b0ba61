#include <adiapass/tridiagonal.hpp>
