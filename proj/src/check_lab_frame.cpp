#include <adiapass/lab_frame.hpp>
