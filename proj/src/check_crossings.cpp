#include <adiapass/crossings.hpp>
