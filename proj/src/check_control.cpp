#include <adiapass/control.hpp>
