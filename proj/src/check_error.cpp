#include <adiapass/error.hpp>
