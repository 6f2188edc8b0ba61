#include <adiapass/branches.hpp>
