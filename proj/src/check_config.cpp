#include <adiapass/config.hpp>
